package com.example.tracker;

import android.content.Context;
import android.view.LayoutInflater;
import android.view.View;
import android.view.ViewGroup;
import android.widget.BaseAdapter;
import android.widget.TextView;

import java.util.List;

class TrackAdapter extends BaseAdapter {
    private final Context context;
    private final List<String> rows;

    TrackAdapter(Context context, List<String> rows) {
        this.context = context;
        this.rows = rows;
    }

    @Override
    public int getCount() {
        return rows.size();
    }

    @Override
    public Object getItem(int position) {
        return rows.get(position);
    }

    @Override
    public long getItemId(int position) {
        return position;
    }

    @Override
    public View getView(int position, View convertView, ViewGroup parent) {
        View row = convertView != null ? convertView
                : LayoutInflater.from(context).inflate(R.layout.track_row, parent, false);
        TextView title = (TextView) row.findViewById(R.id.track_title);
        title.setText(rows.get(position));
        return row;
    }
}
