#pragma once

#include "simconf/bands.hpp"
#include "simconf/difference_constraints.hpp"
#include "simconf/error.hpp"
#include "simconf/harness.hpp"
#include "simconf/numerics.hpp"
#include "simconf/pac.hpp"
#include "simconf/quantile.hpp"
#include "simconf/rng.hpp"
#include "simconf/rwset.hpp"
#include "simconf/scores.hpp"
#include "simconf/statistics.hpp"
