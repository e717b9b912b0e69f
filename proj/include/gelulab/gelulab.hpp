#pragma once

#include "gelulab/activations.hpp"
#include "gelulab/adam.hpp"
#include "gelulab/dataset.hpp"
#include "gelulab/dense.hpp"
#include "gelulab/errors.hpp"
#include "gelulab/experiment.hpp"
#include "gelulab/idx.hpp"
#include "gelulab/loss.hpp"
#include "gelulab/network.hpp"
#include "gelulab/rng.hpp"
#include "gelulab/soi.hpp"
#include "gelulab/special_functions.hpp"
#include "gelulab/tensor.hpp"
