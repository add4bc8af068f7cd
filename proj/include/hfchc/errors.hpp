#pragma once

#include <stdexcept>
#include <string>

namespace hfchc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define HFCHC_ERROR(Name)                 \
    struct Name : Error {                 \
        using Error::Error;               \
    }

// revcore
HFCHC_ERROR(AncillaNotClean);
HFCHC_ERROR(RadixMismatch);
HFCHC_ERROR(DeadRegister);
HFCHC_ERROR(OpaqueProgram);

// An oracle program returned with dirty ancillas. Derives from AncillaNotClean
// so one catch site counts both.
struct OracleContractViolation : AncillaNotClean {
    using AncillaNotClean::AncillaNotClean;
};

// encoding
HFCHC_ERROR(ElementOutOfRange);
HFCHC_ERROR(EmptySet);
HFCHC_ERROR(MalformedEncoding);
HFCHC_ERROR(InvalidK);
HFCHC_ERROR(DuplicateElement);

// setgen
HFCHC_ERROR(PlanViolation);

// graph
struct ParseError : Error {
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};
HFCHC_ERROR(DegreeExceeded);
HFCHC_ERROR(SelfLoop);
HFCHC_ERROR(GenerationFailed);
HFCHC_ERROR(OracleLimitExceeded);

// eppstein
HFCHC_ERROR(SelectionImpossible);
HFCHC_ERROR(AuditFailure);

// qsim
HFCHC_ERROR(InstanceNotReduced);
HFCHC_ERROR(SearchSpaceTooLarge);
HFCHC_ERROR(NoWitness);

// hybrid
HFCHC_ERROR(DomainError);
HFCHC_ERROR(TooSmallBudget);
HFCHC_ERROR(InsufficientData);

#undef HFCHC_ERROR

}  // namespace hfchc
