#pragma once

#include <string>

namespace pmsim::kernels {

enum class Isa { scalar, avx2 };

bool cpu_has_avx2();

// resolved lazily on first call; env PMSIM_ISA=scalar|avx2 overrides autodetect
Isa active_isa();

// test hook; throws std::invalid_argument if the host cannot run the ISA
void force_isa(Isa isa);
void reset_isa();

std::string isa_name(Isa isa);

} // namespace pmsim::kernels
