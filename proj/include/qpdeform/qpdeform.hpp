#pragma once

#include "qpdeform/coherent.hpp"
#include "qpdeform/convergence.hpp"
#include "qpdeform/defexp.hpp"
#include "qpdeform/errors.hpp"
#include "qpdeform/fock.hpp"
#include "qpdeform/qnumbers.hpp"
#include "qpdeform/quadrature.hpp"
#include "qpdeform/unity.hpp"
