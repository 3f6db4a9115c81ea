#pragma once

#include "blowup/error.hpp"
#include "blowup/grid.hpp"
#include "blowup/fft.hpp"
#include "blowup/field.hpp"
#include "blowup/spectral.hpp"
#include "blowup/littlewood_paley.hpp"
#include "blowup/data_builder.hpp"
#include "blowup/certificate.hpp"
#include "blowup/solver.hpp"
#include "blowup/version.hpp"
