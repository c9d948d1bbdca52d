#pragma once

#include "errors.hpp"
#include "matrix.hpp"
#include "netmodel.hpp"
#include "laplacian.hpp"
#include "hermitian_eigen.hpp"
#include "takagi.hpp"
#include "impedance.hpp"
#include "oracle.hpp"
#include "resonance.hpp"
