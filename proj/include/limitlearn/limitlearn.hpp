#pragma once

#include "limitlearn/ext_nat.hpp"
#include "limitlearn/character.hpp"
#include "limitlearn/structure.hpp"
#include "limitlearn/presentation.hpp"
#include "limitlearn/separability.hpp"
#include "limitlearn/learner.hpp"
#include "limitlearn/adversary.hpp"
#include "limitlearn/bridge.hpp"
#include "limitlearn/io.hpp"
#include "limitlearn/registry.hpp"
