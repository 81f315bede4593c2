#pragma once

// Umbrella header: the whole library in one include.

#include "rbmle/common.hpp"
#include "rbmle/random.hpp"
#include "rbmle/chain.hpp"
#include "rbmle/mdp.hpp"
#include "rbmle/solvers.hpp"
#include "rbmle/ergodic.hpp"
#include "rbmle/counts.hpp"
#include "rbmle/confidence.hpp"
#include "rbmle/schedule.hpp"
#include "rbmle/index_optimizer.hpp"
#include "rbmle/agents.hpp"
#include "rbmle/simulate.hpp"
#include "rbmle/theorem.hpp"
#include "rbmle/verify.hpp"
#include "rbmle/io.hpp"
#include "rbmle/config.hpp"
#include "rbmle/runner.hpp"
