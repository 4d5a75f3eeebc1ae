#pragma once

#include "fhx/dd.hpp"
#include "fhx/extended.hpp"
#include "fhx/fh.hpp"
#include "fhx/grid.hpp"
#include "fhx/lebesgue.hpp"
#include "fhx/mp.hpp"
#include "fhx/offset_vector.hpp"
#include "fhx/precision.hpp"
#include "fhx/stability.hpp"
#include "fhx/test_functions.hpp"
#include "fhx/weights.hpp"
