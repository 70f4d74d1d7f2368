#pragma once

#include "types.hpp"
#include "symbol_block.hpp"
#include "linalg2.hpp"
#include "core_map.hpp"
#include "geometry.hpp"
#include "sequences.hpp"
#include "regimes.hpp"
#include "measure.hpp"
#include "thresholds.hpp"
