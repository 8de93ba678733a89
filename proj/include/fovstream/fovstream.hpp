#pragma once

#include "fovstream/codec.hpp"
#include "fovstream/config.hpp"
#include "fovstream/fovea_warp.hpp"
#include "fovstream/frame.hpp"
#include "fovstream/geometry.hpp"
#include "fovstream/metrics.hpp"
#include "fovstream/netmon.hpp"
#include "fovstream/qpmap.hpp"
#include "fovstream/ratectl.hpp"
#include "fovstream/simpipe.hpp"
#include "fovstream/source.hpp"
#include "fovstream/trace.hpp"
#include "fovstream/version.hpp"
