#pragma once

#include "icc/access.hpp"
#include "icc/combiner.hpp"
#include "icc/config.hpp"
#include "icc/denoisers.hpp"
#include "icc/harness.hpp"
#include "icc/metrics.hpp"
#include "icc/model.hpp"
#include "icc/nomographic.hpp"
#include "icc/presets.hpp"
#include "icc/receiver_benchmark.hpp"
#include "icc/receiver_icc.hpp"
#include "icc/rng.hpp"
#include "icc/scenario_file.hpp"
#include "icc/types.hpp"
