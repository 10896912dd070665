#pragma once

#include "siegel/config.hpp"
#include "siegel/driver.hpp"
#include "siegel/ensemble.hpp"
#include "siegel/entropy.hpp"
#include "siegel/error.hpp"
#include "siegel/experiment.hpp"
#include "siegel/geometry.hpp"
#include "siegel/identities.hpp"
#include "siegel/io.hpp"
#include "siegel/linalg.hpp"
#include "siegel/matrix_flow.hpp"
#include "siegel/particle_flow.hpp"
#include "siegel/random.hpp"
#include "siegel/stats.hpp"

namespace siegel {
inline constexpr const char* kVersion = "0.1.0";
}
