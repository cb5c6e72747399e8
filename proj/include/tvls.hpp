#pragma once

// Umbrella header. io.hpp is left out because it needs nlohmann/json; include
// it explicitly when model files are read or written.

#include "tvls/errors.hpp"
#include "tvls/function.hpp"
#include "tvls/kernels.hpp"
#include "tvls/levy.hpp"
#include "tvls/linalg.hpp"
#include "tvls/matrix_exp.hpp"
#include "tvls/model.hpp"
#include "tvls/parallel.hpp"
#include "tvls/quadrature.hpp"
#include "tvls/rng.hpp"
#include "tvls/simulate.hpp"
#include "tvls/spectral.hpp"
#include "tvls/stability.hpp"
#include "tvls/transition.hpp"
#include "tvls/version.hpp"
