#pragma once

#include "ambc/config.hpp"
#include "ambc/covariance.hpp"
#include "ambc/detectors.hpp"
#include "ambc/errors.hpp"
#include "ambc/frame_io.hpp"
#include "ambc/model.hpp"
#include "ambc/montecarlo.hpp"
#include "ambc/report.hpp"
#include "ambc/rng.hpp"
#include "ambc/run_config.hpp"
#include "ambc/special.hpp"
#include "ambc/theory.hpp"
#include "ambc/tracy_widom.hpp"
#include "ambc/types.hpp"
