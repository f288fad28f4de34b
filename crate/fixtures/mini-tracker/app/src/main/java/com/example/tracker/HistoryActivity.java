package com.example.tracker;

import android.app.ListActivity;
import android.database.Cursor;
import android.os.Bundle;
import android.widget.ArrayAdapter;

import com.example.tracker.data.TrackDatabase;

import java.util.ArrayList;
import java.util.List;

public class HistoryActivity extends ListActivity {
    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        TrackDatabase db = new TrackDatabase(this);
        List<String> rows = new ArrayList<>();
        Cursor tracks = db.recent(20);
        while (tracks.moveToNext()) {
            rows.add(tracks.getString(1) + " (" + tracks.getLong(2) + " m)");
        }
        tracks.close();
        setListAdapter(new TrackAdapter(this, rows));
    }
}
