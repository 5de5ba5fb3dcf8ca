#pragma once

#include "vnge/calibration.hpp"
#include "vnge/error.hpp"
#include "vnge/estimators.hpp"
#include "vnge/generators.hpp"
#include "vnge/graph.hpp"
#include "vnge/harness.hpp"
#include "vnge/purity.hpp"
#include "vnge/random.hpp"
#include "vnge/similarity.hpp"
#include "vnge/spectral.hpp"
