#ifndef SHUTTER_ERROR_HPP
#define SHUTTER_ERROR_HPP

#include <stdexcept>
#include <string>

namespace shutter {

enum class Errc {
    NonPositiveParameter,
    EEqualsV,
    NonFinite,
    Overflow,
    NonPositiveTime,
    ZeroWavenumber,
    XOutOfRange,
    PoleNotConverged,
    DuplicatePole,
    CountMismatch,
    NormalizationSingular,
    PoleCollision,
    NotConverged,
    AmplitudeUnderflow,
    WindowTooNarrow,
    NoCrossing,
    GridTooCoarse,
    AbsorberLeak,
    UnknownKey,
    TypeError,
    MissingRequired,
    IoError,
};

inline const char* errc_name(Errc e)
{
    switch (e) {
    case Errc::NonPositiveParameter: return "NonPositiveParameter";
    case Errc::EEqualsV: return "EEqualsV";
    case Errc::NonFinite: return "NonFinite";
    case Errc::Overflow: return "Overflow";
    case Errc::NonPositiveTime: return "NonPositiveTime";
    case Errc::ZeroWavenumber: return "ZeroWavenumber";
    case Errc::XOutOfRange: return "XOutOfRange";
    case Errc::PoleNotConverged: return "PoleNotConverged";
    case Errc::DuplicatePole: return "DuplicatePole";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::NormalizationSingular: return "NormalizationSingular";
    case Errc::PoleCollision: return "PoleCollision";
    case Errc::NotConverged: return "NotConverged";
    case Errc::AmplitudeUnderflow: return "AmplitudeUnderflow";
    case Errc::WindowTooNarrow: return "WindowTooNarrow";
    case Errc::NoCrossing: return "NoCrossing";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::AbsorberLeak: return "AbsorberLeak";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::TypeError: return "TypeError";
    case Errc::MissingRequired: return "MissingRequired";
    case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

// process exit status: 2 validation, 3 numerical, 4 io
inline int exit_code(Errc e)
{
    switch (e) {
    case Errc::NonFinite:
    case Errc::Overflow:
    case Errc::PoleNotConverged:
    case Errc::DuplicatePole:
    case Errc::CountMismatch:
    case Errc::NormalizationSingular:
    case Errc::PoleCollision:
    case Errc::NotConverged:
    case Errc::AmplitudeUnderflow:
    case Errc::WindowTooNarrow:
    case Errc::NoCrossing:
    case Errc::AbsorberLeak:
        return 3;
    case Errc::IoError:
        return 4;
    default:
        return 2;
    }
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace shutter

#endif
