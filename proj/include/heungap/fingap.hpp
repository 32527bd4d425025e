#ifndef HEUNGAP_FINGAP_HPP
#define HEUNGAP_FINGAP_HPP

#include "fingap/delta.hpp"
#include "fingap/heun.hpp"
#include "fingap/operator.hpp"
#include "fingap/xi.hpp"

#endif
