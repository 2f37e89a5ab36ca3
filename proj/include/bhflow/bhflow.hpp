#pragma once

#include "errors.hpp"
#include "grp.hpp"
#include "limits.hpp"
#include "model.hpp"
#include "params.hpp"
#include "riemann.hpp"
#include "scheme.hpp"
#include "steady.hpp"
