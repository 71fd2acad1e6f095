#pragma once

// Library without the CLI layer (which needs CLI11).
#include "marginrec/core.hpp"
#include "marginrec/geometry.hpp"
#include "marginrec/instances.hpp"
#include "marginrec/io.hpp"
#include "marginrec/margins.hpp"
#include "marginrec/oracle.hpp"
#include "marginrec/recovery/cheatr.hpp"
#include "marginrec/recovery/closure.hpp"
#include "marginrec/recovery/mrecur.hpp"
#include "marginrec/recovery/report.hpp"
#include "marginrec/sampling/random.hpp"
#include "marginrec/sampling/walk.hpp"
