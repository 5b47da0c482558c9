#pragma once

#include "vds/acquisition.hpp"
#include "vds/density.hpp"
#include "vds/empirical.hpp"
#include "vds/experiment.hpp"
#include "vds/fft.hpp"
#include "vds/grid.hpp"
#include "vds/io.hpp"
#include "vds/markov.hpp"
#include "vds/parallel.hpp"
#include "vds/parametric.hpp"
#include "vds/phantom.hpp"
#include "vds/reconstruct.hpp"
#include "vds/rng.hpp"
#include "vds/sampler_iid.hpp"
#include "vds/scheme.hpp"
#include "vds/serialize.hpp"
#include "vds/trajectory.hpp"
#include "vds/tsp.hpp"
#include "vds/wavelet.hpp"
