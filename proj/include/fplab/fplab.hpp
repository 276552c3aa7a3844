#ifndef FPLAB_FPLAB_HPP
#define FPLAB_FPLAB_HPP

#include "fplab/drift.hpp"
#include "fplab/errors.hpp"
#include "fplab/fpe_numeric.hpp"
#include "fplab/langevin.hpp"
#include "fplab/model.hpp"
#include "fplab/perturbation.hpp"
#include "fplab/quadrature.hpp"
#include "fplab/scaling.hpp"
#include "fplab/similarity.hpp"
#include "fplab/tolerances.hpp"

#endif  // FPLAB_FPLAB_HPP
