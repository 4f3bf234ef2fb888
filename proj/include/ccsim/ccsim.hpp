#pragma once

// Umbrella header: simulation and analysis of caching-aided coded
// multicasting (random + deterministic placements, clique-cover deliveries,
// Monte Carlo harness, closed-form bounds).

#include "ccsim/analysis.hpp"
#include "ccsim/cache.hpp"
#include "ccsim/combinatorics.hpp"
#include "ccsim/delivery.hpp"
#include "ccsim/harness.hpp"
#include "ccsim/placement.hpp"
#include "ccsim/plan.hpp"
#include "ccsim/rational.hpp"
#include "ccsim/rng.hpp"
#include "ccsim/side_info.hpp"
#include "ccsim/stats.hpp"
#include "ccsim/system.hpp"
#include "ccsim/user_set.hpp"
