#pragma once

#include "ansgd/baselines.hpp"
#include "ansgd/engine.hpp"
#include "ansgd/errors.hpp"
#include "ansgd/harness.hpp"
#include "ansgd/losses.hpp"
#include "ansgd/reference.hpp"
#include "ansgd/regret.hpp"
#include "ansgd/rng.hpp"
#include "ansgd/schedule.hpp"
#include "ansgd/sparse_data.hpp"
