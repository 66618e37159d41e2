/* Inner loop of sparse Gaussian elimination mod p (p < 2^31).
 *
 * The caller keeps a dense scratch row with values in [0, p) and a pool of
 * normalized pivot rows (positions ascending, leading value 1).  reduce_row
 * walks the scratch left to right, subtracting pivot rows, and returns the
 * first position with no pivot (the new pivot position) or -1 when the row
 * reduces to zero.
 */

#include <stdint.h>

/* Returns the new pivot position, -1 when the row reduces to zero (or, in
 * full mode, when every pivot hit has been eliminated), or -2 when more
 * than `budget` eliminations were needed (budget <= 0: unlimited; on -2
 * the caller owns cleaning the scratch).  In full mode (full != 0) the
 * walk does not stop at pivot-free columns: it reduces the row against
 * every pivot to its right, which is the inner loop of back-reduction. */
int64_t reduce_row(int64_t *scratch, int64_t ncols, int64_t p,
                   const int64_t *pivot_of_pos,
                   const int64_t *row_start, const int64_t *row_len,
                   const int32_t *pos_pool, const int64_t *val_pool,
                   int64_t cursor, int64_t budget, int64_t full)
{
    int64_t steps = 0;
    while (cursor < ncols && scratch[cursor] == 0)
        cursor++;
    while (cursor < ncols) {
        int64_t ri = pivot_of_pos[cursor];
        if (ri < 0) {
            if (!full)
                return cursor;
            cursor++;
            while (cursor < ncols && scratch[cursor] == 0)
                cursor++;
            continue;
        }
        if (budget > 0 && ++steps > budget)
            return -2;
        int64_t f = scratch[cursor];
        const int32_t *pp = pos_pool + row_start[ri];
        const int64_t *vv = val_pool + row_start[ri];
        int64_t len = row_len[ri];
        for (int64_t k = 0; k < len; k++) {
            int64_t x = scratch[pp[k]] - (f * vv[k]) % p;
            scratch[pp[k]] = x < 0 ? x + p : x;
        }
        while (cursor < ncols && scratch[cursor] == 0)
            cursor++;
    }
    return -1;
}
