#include <math.h>
#include <stdio.h>
#include <string.h>

#include "bloch_atlas.h"

static int fail(const char *what) {
    fprintf(stderr, "%s: %s\n", what, ba_last_error_message());
    return 1;
}

int main(void) {
    BaScenario *s = NULL;
    if (ba_analyze_pair(4, 3, 6, "2x2", true, &s) != BA_STATUS_OK) return fail("pair");
    BaMeasures m;
    if (ba_scenario_measures(s, &m) != BA_STATUS_OK) return fail("measures");
    BaBoundary b;
    if (ba_scenario_boundary(s, &b) != BA_STATUS_OK) return fail("boundary");
    char *json = ba_scenario_to_json(s);
    if (json == NULL || strstr(json, "\"total\"") == NULL) return fail("json");
    ba_string_free(json);
    ba_scenario_free(s);
    printf("%.9f %.9f %.9f\n", m.total, m.joint, m.probability);

    if (ba_analyze_pair(4, 3, 3, "2x2", false, &s) != BA_STATUS_INVALID_ARGUMENT || s != NULL) return 2;
    if (strlen(ba_last_error_message()) == 0) return 3;

    BaClassTable *t = NULL;
    if (ba_enumerate(4, "2x2", 1, &t) != BA_STATUS_OK) return fail("enumerate");
    BaClass c;
    if (ba_class_table_get(t, 0, &c, NULL) != BA_STATUS_OK) return fail("class");
    printf("%zu classes, first {%zu,%zu} x%zu, %zu trivial\n", ba_class_table_len(t), c.representative_a,
           c.representative_b, c.count, ba_class_table_trivial_count(t));
    ba_class_table_free(t);
    return fabs(m.probability - 0.70710678118654752) < 1e-9 ? 0 : 4;
}
