#pragma once

#include "ehrenfest/composition.hpp"
#include "ehrenfest/cutoff.hpp"
#include "ehrenfest/error.hpp"
#include "ehrenfest/families.hpp"
#include "ehrenfest/gelfand.hpp"
#include "ehrenfest/group.hpp"
#include "ehrenfest/krawtchouk.hpp"
#include "ehrenfest/model.hpp"
#include "ehrenfest/numeric.hpp"
#include "ehrenfest/oracle.hpp"
#include "ehrenfest/urn_chain.hpp"
