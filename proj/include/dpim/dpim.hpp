#pragma once

#include "dpim/error.hpp"
#include "dpim/special.hpp"
#include "dpim/quadrature.hpp"
#include "dpim/random.hpp"
#include "dpim/signal.hpp"
#include "dpim/channel.hpp"
#include "dpim/detect.hpp"
#include "dpim/order_stats.hpp"
#include "dpim/bounds.hpp"
#include "dpim/coding.hpp"
#include "dpim/optimize.hpp"
#include "dpim/harness.hpp"
#include "dpim/report.hpp"
#include "dpim/study.hpp"
