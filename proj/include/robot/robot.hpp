#pragma once

#include "robot/core.hpp"
#include "robot/cost.hpp"
#include "robot/datagen.hpp"
#include "robot/detect.hpp"
#include "robot/diagnostics.hpp"
#include "robot/formulations.hpp"
#include "robot/io.hpp"
#include "robot/random.hpp"
#include "robot/reconstruct.hpp"
#include "robot/semidiscrete.hpp"
#include "robot/simplex.hpp"
#include "robot/sinkhorn.hpp"
#include "robot/transport.hpp"
