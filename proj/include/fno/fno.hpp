#pragma once

// Umbrella header.

#include <fno/besov.hpp>
#include <fno/cli.hpp>
#include <fno/fft.hpp>
#include <fno/hopf.hpp>
#include <fno/paths.hpp>
#include <fno/permgraph.hpp>
#include <fno/quadrature.hpp>
#include <fno/regularize.hpp>
#include <fno/roughpath.hpp>
#include <fno/spectral.hpp>
#include <fno/tree.hpp>
