#pragma once

// Umbrella header.

#include "errors.hpp"
#include "forward.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "phantom.hpp"
#include "quartic.hpp"
#include "recon.hpp"
#include "sinogram.hpp"
#include "vec3.hpp"
