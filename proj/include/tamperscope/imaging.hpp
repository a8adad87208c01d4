#pragma once

#include "tamperscope/imaging/codec.hpp"
#include "tamperscope/imaging/color.hpp"
#include "tamperscope/imaging/dct.hpp"
#include "tamperscope/imaging/filter.hpp"
#include "tamperscope/imaging/morph.hpp"
#include "tamperscope/imaging/wavelet.hpp"
