#pragma once

#include "vcqed/csv.hpp"
#include "vcqed/dressed.hpp"
#include "vcqed/dynamics.hpp"
#include "vcqed/entanglement.hpp"
#include "vcqed/error.hpp"
#include "vcqed/figures.hpp"
#include "vcqed/gmres.hpp"
#include "vcqed/hilbert.hpp"
#include "vcqed/model.hpp"
#include "vcqed/observables.hpp"
#include "vcqed/params.hpp"
#include "vcqed/propagator.hpp"
#include "vcqed/selftest.hpp"
#include "vcqed/steady.hpp"
#include "vcqed/sweep.hpp"
