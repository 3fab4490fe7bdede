#pragma once

#include <stdexcept>
#include <string>

namespace rominv {

// Failure categories map 1:1 onto CLI exit codes.
enum class errc {
    config  = 2,
    io      = 3,
    parse   = 4,
    numeric = 5,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }
    int exit_code() const { return static_cast<int>(code_); }

private:
    errc code_;
};

#define ROMINV_DEFINE_ERROR(NAME, CATEGORY)                                        \
    class NAME : public Error {                                                    \
    public:                                                                        \
        explicit NAME(const std::string& what) : Error(errc::CATEGORY, what) {}    \
    }

// core-series
ROMINV_DEFINE_ERROR(NonDivisibleError, config);
ROMINV_DEFINE_ERROR(WindowTooLongError, config);
ROMINV_DEFINE_ERROR(ShapeMismatchError, config);
ROMINV_DEFINE_ERROR(InvalidSeriesError, config);

// vtk-parse
ROMINV_DEFINE_ERROR(BadMagicError, parse);
ROMINV_DEFINE_ERROR(BinaryUnsupportedError, parse);
ROMINV_DEFINE_ERROR(TruncatedSectionError, parse);
ROMINV_DEFINE_ERROR(UnknownDatasetError, parse);
ROMINV_DEFINE_ERROR(NoSuchArrayError, config);
ROMINV_DEFINE_ERROR(NoMatchingPointError, parse);
ROMINV_DEFINE_ERROR(InconsistentSurfacePointError, parse);

// synthetic-forward
ROMINV_DEFINE_ERROR(DuplicateRateError, config);
ROMINV_DEFINE_ERROR(NonUnitNormalError, config);

// lstm-rom
ROMINV_DEFINE_ERROR(DimensionMismatchError, config);
ROMINV_DEFINE_ERROR(NonFiniteLossError, numeric);
ROMINV_DEFINE_ERROR(ModelFormatError, parse);

// bayes-mcmc
ROMINV_DEFINE_ERROR(NonPositiveVarianceError, numeric);
ROMINV_DEFINE_ERROR(LengthMismatchError, config);
ROMINV_DEFINE_ERROR(BadParametersError, config);
ROMINV_DEFINE_ERROR(ShortHistoryError, config);
ROMINV_DEFINE_ERROR(EmptyPostBurnInError, config);

// cli-pipeline
ROMINV_DEFINE_ERROR(ConfigError, config);
ROMINV_DEFINE_ERROR(IoError, io);
ROMINV_DEFINE_ERROR(CsvParseError, parse);
ROMINV_DEFINE_ERROR(MissingCellError, config);

#undef ROMINV_DEFINE_ERROR

} // namespace rominv
