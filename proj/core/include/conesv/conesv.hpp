#pragma once

#include "conesv/apps.hpp"
#include "conesv/bfas.hpp"
#include "conesv/bnb.hpp"
#include "conesv/cones.hpp"
#include "conesv/eao.hpp"
#include "conesv/error.hpp"
#include "conesv/instance.hpp"
#include "conesv/matrix_io.hpp"
#include "conesv/numerics.hpp"
#include "conesv/srpl.hpp"
