package queue

// Queue is a first in first out collection of integer jobs.
type Queue struct {
	items []int
}

// Push appends a job to the back of the queue and reports the new length.
func (q *Queue) Push(v int) int {
	q.items = append(q.items, v)
	return len(q.items)
}

// Pop removes the job at the front of the queue.
// It returns false when the queue has no jobs left.
func (q *Queue) Pop() (int, bool) {
	if len(q.items) == 0 {
		return 0, false
	}
	v := q.items[0]
	// shift the remaining jobs towards the front
	q.items = q.items[1:]
	return v, true
}

func (q *Queue) Len() int {
	return len(q.items)
}
