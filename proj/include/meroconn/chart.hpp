#pragma once

#include <string>
#include <vector>

#include "errors.hpp"
#include "multipoly.hpp"

namespace meroconn {

// One irreducible component of the divisor, declared by the user.
// Irreducibility is trusted, not verified.
struct DivisorComponent {
    MultiPoly poly;
    int multiplicity = 1;
    std::string label;

    DivisorComponent() = default;
    DivisorComponent(MultiPoly p, int mult = 1, std::string name = {})
        : poly(std::move(p)), multiplicity(mult), label(std::move(name)) {
        if (poly.is_constant()) throw ValidationError("divisor component must be non-constant");
        if (multiplicity < 1) throw ValidationError("divisor multiplicity must be positive");
    }
};

// A coordinate chart of C^n with a polynomial divisor.
struct Chart {
    std::size_t nvars = 0;
    std::vector<std::string> var_names;
    std::vector<DivisorComponent> divisor;

    Chart() = default;
    Chart(std::vector<std::string> names, std::vector<DivisorComponent> div = {})
        : nvars(names.size()), var_names(std::move(names)), divisor(std::move(div)) {
        for (std::size_t a = 0; a < var_names.size(); ++a)
            for (std::size_t b = a + 1; b < var_names.size(); ++b)
                if (var_names[a] == var_names[b])
                    throw ValidationError("chart variable names must be distinct");
        for (const auto& q : divisor)
            if (q.poly.nvars() != nvars)
                throw ValidationError("divisor polynomial has wrong variable count");
    }

    std::vector<MultiPoly> divisor_polys() const {
        std::vector<MultiPoly> out;
        out.reserve(divisor.size());
        for (const auto& q : divisor) out.push_back(q.poly);
        return out;
    }
};

} // namespace meroconn
