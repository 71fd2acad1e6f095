#pragma once

#include "marginrec/geometry/hull.hpp"
#include "marginrec/geometry/hull_distance.hpp"
#include "marginrec/geometry/hull_lp.hpp"
#include "marginrec/geometry/mvee.hpp"
#include "marginrec/geometry/pseudometric.hpp"
