#pragma once

// Umbrella header for the sparse_spectra library.

#include "sparse_spectra/core.hpp"
#include "sparse_spectra/spectral.hpp"
#include "sparse_spectra/parallel.hpp"
#include "sparse_spectra/problem.hpp"
#include "sparse_spectra/heuristics.hpp"
#include "sparse_spectra/bounds.hpp"
#include "sparse_spectra/bnb.hpp"
#include "sparse_spectra/ssvd.hpp"
#include "sparse_spectra/bruteforce.hpp"
#include "sparse_spectra/milp.hpp"
#include "sparse_spectra/io.hpp"
