#pragma once

// Convenience umbrella header.

#include "pinchlab/curvature.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/functionals.hpp"
#include "pinchlab/mesh.hpp"
#include "pinchlab/mesh_io.hpp"
#include "pinchlab/pinch.hpp"
#include "pinchlab/report_json.hpp"
#include "pinchlab/shapes.hpp"
#include "pinchlab/spectral.hpp"
#include "pinchlab/sweep.hpp"
#include "pinchlab/version.hpp"
