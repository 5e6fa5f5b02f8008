#pragma once

#include "matspec/core.hpp"
#include "matspec/direct.hpp"
#include "matspec/graph.hpp"
#include "matspec/inverse.hpp"
#include "matspec/io.hpp"
#include "matspec/kernels.hpp"
#include "matspec/parallel.hpp"
#include "matspec/stability.hpp"
#include "matspec/types.hpp"
