#pragma once

#include "hazcomm/clock.hpp"
#include "hazcomm/core_model.hpp"
#include "hazcomm/dispatch.hpp"
#include "hazcomm/errors.hpp"
#include "hazcomm/harness.hpp"
#include "hazcomm/metrics.hpp"
#include "hazcomm/net.hpp"
#include "hazcomm/perception.hpp"
#include "hazcomm/pipeline.hpp"
#include "hazcomm/remote.hpp"
#include "hazcomm/report.hpp"
#include "hazcomm/trace.hpp"
#include "hazcomm/wire.hpp"
