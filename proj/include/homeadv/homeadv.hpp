#pragma once

#include "homeadv/error.hpp"
#include "homeadv/match_data.hpp"
#include "homeadv/pipeline.hpp"
#include "homeadv/rating_engine.hpp"
#include "homeadv/reporting.hpp"
#include "homeadv/rolling_estimator.hpp"
#include "homeadv/stats_tests.hpp"
#include "homeadv/synthetic.hpp"
#include "homeadv/win_calibration.hpp"
