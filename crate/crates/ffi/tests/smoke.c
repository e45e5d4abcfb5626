#include <stdio.h>
#include <string.h>
#include "lm.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); return 1; } } while (0)

int main(void) {
    int64_t k = 0;
    CHECK(lm_value_map(8, 3, 10, &k) == LM_STATUS_OK && k == 76);
    CHECK(lm_add(1, LM_POLICY_TRAP, 1, 1, &k) == LM_STATUS_BOUNDARY);
    char *msg = lm_last_error_message();
    CHECK(msg != NULL && strstr(msg, "2/1") != NULL);
    lm_string_free(msg);

    LmSet *s = NULL;
    CHECK(lm_set_new(1, &s) == LM_STATUS_OK);
    CHECK(lm_set_insert(s, 0) == LM_STATUS_OK);
    CHECK(lm_set_insert(s, 1) == LM_STATUS_CARDINALITY);
    lm_set_free(s);

    int16_t r = 0;
    CHECK(lm_q88_mul(384, 512, LM_ROUNDING_TRUNCATE, &r) == LM_STATUS_OK && r == 768);
    CHECK(lm_q88_add(25600, 25600, &r) == LM_STATUS_TRAP);

    LmProgram *p = NULL;
    CHECK(lm_program_parse("#bits 1\n#regs 1\nJMP 0\n", &p) == LM_STATUS_OK);
    LmOutcome o;
    CHECK(lm_program_decide(p, NULL, 0, 0, &o) == LM_STATUS_OK);
    CHECK(o.kind == LM_OUTCOME_KIND_CYCLE && o.prefix == 0 && o.period == 1);
    lm_program_free(p);

    LmLawSummary sum;
    CHECK(lm_check_law(1, LM_LAW_ASSOCIATIVITY, 0, &sum) == LM_STATUS_OK);
    CHECK(sum.has_canonical && sum.canonical[0] == 1 && sum.canonical[2] == -1);

    printf("c smoke ok\n");
    return 0;
}
