#pragma once

#include <stdexcept>
#include <string>

namespace fragdmrg {

struct Error : std::runtime_error {
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

#define FRAGDMRG_DEFINE_ERROR(name)                                           \
    struct name : Error {                                                      \
        explicit name(const std::string &msg) : Error(#name ": " + msg) {}     \
    }

// symtensor
FRAGDMRG_DEFINE_ERROR(IncompatibleIndex);
FRAGDMRG_DEFINE_ERROR(RankError);
FRAGDMRG_DEFINE_ERROR(EmptySpectrum);
FRAGDMRG_DEFINE_ERROR(NoConvergence);

// hamio
FRAGDMRG_DEFINE_ERROR(MalformedHeader);
FRAGDMRG_DEFINE_ERROR(IndexOutOfRange);
FRAGDMRG_DEFINE_ERROR(DuplicateConflict);
FRAGDMRG_DEFINE_ERROR(ScfNoConvergence);

// mpsmpo
FRAGDMRG_DEFINE_ERROR(ZeroNorm);
FRAGDMRG_DEFINE_ERROR(ShapeMismatch);

// embed
FRAGDMRG_DEFINE_ERROR(NonSymmetricRdm);
FRAGDMRG_DEFINE_ERROR(NonIntegerElectronCount);

// bips
FRAGDMRG_DEFINE_ERROR(OrderMismatch);
FRAGDMRG_DEFINE_ERROR(UnreachableSector);
FRAGDMRG_DEFINE_ERROR(EmptyBasis);

// spin
FRAGDMRG_DEFINE_ERROR(InconsistentSpinLabels);

// analysis
FRAGDMRG_DEFINE_ERROR(ThresholdOutOfRange);
FRAGDMRG_DEFINE_ERROR(InvalidLabel);

// fcioracle
FRAGDMRG_DEFINE_ERROR(BasisTooLarge);
FRAGDMRG_DEFINE_ERROR(TooLarge);

// cli
FRAGDMRG_DEFINE_ERROR(ConfigError);

#undef FRAGDMRG_DEFINE_ERROR

} // namespace fragdmrg
