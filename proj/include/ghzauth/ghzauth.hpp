#pragma once

#include "ghzauth/adversary.hpp"
#include "ghzauth/authkey.hpp"
#include "ghzauth/entanglement.hpp"
#include "ghzauth/protocol.hpp"
#include "ghzauth/rng.hpp"
#include "ghzauth/statevec.hpp"
