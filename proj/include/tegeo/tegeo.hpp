#pragma once

#include "tegeo/config.hpp"
#include "tegeo/evaluate.hpp"
#include "tegeo/expr.hpp"
#include "tegeo/fields.hpp"
#include "tegeo/forms.hpp"
#include "tegeo/gallery.hpp"
#include "tegeo/generators.hpp"
#include "tegeo/geometry.hpp"
#include "tegeo/jet.hpp"
#include "tegeo/report.hpp"
#include "tegeo/verify.hpp"
