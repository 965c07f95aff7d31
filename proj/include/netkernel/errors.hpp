#pragma once

#include <stdexcept>
#include <string>

namespace netkernel {

// Exit-code categories used by the CLI: config=2, data=3, numerical=4.
enum class ErrorCode : int { Config = 2, Data = 3, Numerical = 4 };

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string name, const std::string& msg)
        : std::runtime_error(name + ": " + msg), code_(code), name_(std::move(name)) {}
    ErrorCode code() const noexcept { return code_; }
    const std::string& name() const noexcept { return name_; }

  private:
    ErrorCode code_;
    std::string name_;
};

#define NETKERNEL_DEFINE_ERROR(NAME, CODE)                                     \
    class NAME : public Error {                                               \
      public:                                                                  \
        explicit NAME(const std::string& msg)                                  \
            : Error(ErrorCode::CODE, #NAME, msg) {}                            \
    };

NETKERNEL_DEFINE_ERROR(ConfigError, Config)
NETKERNEL_DEFINE_ERROR(DataError, Data)

NETKERNEL_DEFINE_ERROR(NonFiniteInput, Numerical)
NETKERNEL_DEFINE_ERROR(SingularSystem, Numerical)
NETKERNEL_DEFINE_ERROR(IterationLimit, Numerical)
NETKERNEL_DEFINE_ERROR(RankDeficient, Numerical)
NETKERNEL_DEFINE_ERROR(DimensionMismatch, Numerical)
NETKERNEL_DEFINE_ERROR(ShapeMismatch, Numerical)
NETKERNEL_DEFINE_ERROR(DegreeOutOfRange, Numerical)
NETKERNEL_DEFINE_ERROR(NonFiniteState, Numerical)
NETKERNEL_DEFINE_ERROR(ZeroCoefficient, Numerical)
NETKERNEL_DEFINE_ERROR(AllRowsDegenerate, Numerical)
NETKERNEL_DEFINE_ERROR(NonFiniteLoss, Numerical)
NETKERNEL_DEFINE_ERROR(AllZero, Numerical)
NETKERNEL_DEFINE_ERROR(EmptyMeasure, Numerical)
NETKERNEL_DEFINE_ERROR(DegenerateDenominator, Numerical)
NETKERNEL_DEFINE_ERROR(ZeroTrueKernel, Numerical)
NETKERNEL_DEFINE_ERROR(NoLeaders, Numerical)
NETKERNEL_DEFINE_ERROR(RankDeficientV, Numerical)

#undef NETKERNEL_DEFINE_ERROR

}  // namespace netkernel
