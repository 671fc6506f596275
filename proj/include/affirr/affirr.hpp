// Everything except the command-line front end.

#ifndef AFFIRR_AFFIRR_HPP_
#define AFFIRR_AFFIRR_HPP_

#include "affine.hpp"
#include "constructions.hpp"
#include "io.hpp"
#include "numkernel.hpp"
#include "presentation.hpp"
#include "repcoh.hpp"
#include "separating.hpp"
#include "types.hpp"

#endif  // AFFIRR_AFFIRR_HPP_
