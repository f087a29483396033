#pragma once

#include "ring_thermo/canonical.hpp"
#include "ring_thermo/core_model.hpp"
#include "ring_thermo/errors.hpp"
#include "ring_thermo/grand_canonical.hpp"
#include "ring_thermo/numerics.hpp"
#include "ring_thermo/sweep.hpp"
