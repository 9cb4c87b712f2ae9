#pragma once

#include "ymh/geometry.hpp"
#include "ymh/field.hpp"
#include "ymh/forms.hpp"
#include "ymh/bundle.hpp"
#include "ymh/rng.hpp"
#include "ymh/functionals.hpp"
#include "ymh/flow.hpp"
#include "ymh/spectral.hpp"
#include "ymh/serialize.hpp"
