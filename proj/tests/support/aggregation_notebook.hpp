#pragma once

#include <string>

// Three-cell aggregation notebook: c1 defines two aggregates and two frames,
// c2 gathers the aggregates into a dict, c3 applies them. The edited c1 fixes
// the custom aggregate; rerunning c3 afterwards without c2 is unsafe.
namespace cellguard::testing::aggregation {

    inline const std::string c1 =
            "def min_agg(col):\n"
            "    best = col[0]\n"
            "    for v in col:\n"
            "        if v < best:\n"
            "            best = v\n"
            "    return best\n"
            "def custom_agg(col):\n"
            "    return len(col) * 10\n"
            "def frame(values):\n"
            "    return {\"values\": values, \"agg\": lambda fns: map(lambda k: fns[k](values), list(fns))}\n"
            "df_x = frame([3, 1, 2])\n"
            "df_y = frame([5, 4])\n";

    inline const std::string c1_fixed =
            "def min_agg(col):\n"
            "    best = col[0]\n"
            "    for v in col:\n"
            "        if v < best:\n"
            "            best = v\n"
            "    return best\n"
            "def custom_agg(col):\n"
            "    return len(col) * 2\n"
            "def frame(values):\n"
            "    return {\"values\": values, \"agg\": lambda fns: map(lambda k: fns[k](values), list(fns))}\n"
            "df_x = frame([3, 1, 2])\n"
            "df_y = frame([5, 4])\n";

    inline const std::string c2 = "agg_by_col = {\"min\": min_agg, \"custom\": custom_agg}\n";

    inline const std::string c3 =
            "df_agg_x = df_x.agg(agg_by_col)\n"
            "df_agg_y = df_y.agg(agg_by_col)\n";

}  // namespace cellguard::testing::aggregation
