#pragma once

#include "mchull/error.hpp"
#include "mchull/flow.hpp"
#include "mchull/grid.hpp"
#include "mchull/hull.hpp"
#include "mchull/maxflow.hpp"
#include "mchull/mesh.hpp"
#include "mchull/mincut.hpp"
#include "mchull/pool.hpp"
#include "mchull/report.hpp"
#include "mchull/scenes.hpp"
#include "mchull/sdf.hpp"
#include "mchull/stencil.hpp"
#include "mchull/verify.hpp"
