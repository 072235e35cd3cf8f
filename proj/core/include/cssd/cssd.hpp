#pragma once

#include "cssd/energy.hpp"
#include "cssd/error.hpp"
#include "cssd/model_selection.hpp"
#include "cssd/oracle.hpp"
#include "cssd/preprocess.hpp"
#include "cssd/segment_fit.hpp"
#include "cssd/solver.hpp"
#include "cssd/synthetic.hpp"
#include "cssd/types.hpp"
