#pragma once

#include "alcore/config.hpp"
#include "alcore/errors.hpp"
#include "alcore/format.hpp"
#include "alcore/matrix.hpp"
#include "alcore/neural.hpp"
#include "alcore/pool.hpp"
#include "alcore/rng.hpp"
#include "alcore/simulator.hpp"
#include "alcore/strategies.hpp"
