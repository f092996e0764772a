#pragma once

#include "neurotac/classify.hpp"
#include "neurotac/config.hpp"
#include "neurotac/encoding.hpp"
#include "neurotac/error.hpp"
#include "neurotac/event_io.hpp"
#include "neurotac/metrics.hpp"
#include "neurotac/optimize.hpp"
#include "neurotac/report.hpp"
#include "neurotac/seed.hpp"
#include "neurotac/simulator.hpp"
#include "neurotac/transduction.hpp"
#include "neurotac/types.hpp"
