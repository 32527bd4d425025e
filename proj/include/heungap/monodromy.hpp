#ifndef HEUNGAP_MONODROMY_HPP
#define HEUNGAP_MONODROMY_HPP

#include "monodromy/floquet.hpp"
#include "monodromy/hk.hpp"
#include "monodromy/hyperelliptic.hpp"

#endif
